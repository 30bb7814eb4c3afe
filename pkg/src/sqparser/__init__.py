"""sqparser: encoder-decoder shift-reduce parsing for dependency and
constituent treebanks."""

__version__ = "0.1.0"
