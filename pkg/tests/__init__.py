# Tests package for the BREA simulator
