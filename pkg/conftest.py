"""
Shared pytest configuration
"""


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo or table reproduction runs")
