def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long numerical sweeps (deselect with -m 'not slow')")
