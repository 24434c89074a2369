"""
Pytest configuration for tests with logging enabled.
"""
import logging
import sys

from hypothesis import settings

# Configure logging to show INFO and above by default
# Can be overridden with pytest --log-cli-level flag
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stdout
)

# Exact arithmetic on random matrices has no useful per-example deadline
settings.register_profile("homsense", deadline=None, print_blob=True)
settings.load_profile("homsense")

# Enable bittensor logging
try:
    from bittensor.utils.btlogging import logging as bt_logging
    bt_logging.enable_info()
except ImportError:
    pass
