"""Unit test package for LSPlus."""
