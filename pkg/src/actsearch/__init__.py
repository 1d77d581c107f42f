"""Active search for k nearest neighbors on rasterized 2-D point sets."""
