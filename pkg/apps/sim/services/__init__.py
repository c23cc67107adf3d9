# Empty file to make this directory a Python package
