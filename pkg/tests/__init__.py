"""Test package for saddlegame-core."""
