# Empty on purpose.  Required so `pytest` treats tests as a package.
