"""
conftest.py - Shared pytest configuration

Registers the hypothesis profiles: "default" for local runs and "ci" with more
examples. Select with HYPOTHESIS_PROFILE=ci.
"""

import os

from hypothesis import HealthCheck, settings


settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "ci", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))
