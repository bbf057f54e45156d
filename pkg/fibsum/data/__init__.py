# Package data for fibsum: the shipped identity catalog.
