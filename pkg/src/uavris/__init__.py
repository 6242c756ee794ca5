"""Analytical model and Monte-Carlo oracle for UAV-mounted RIS IoT data collection."""

from .analytics import (CoverageResult, MacAnalytics, avg_throughput, avg_transmissions,
                        coverage, coverage_cc, mac_analytics, p_success, round_success)
from .channel import DiskGeometry, EquivalentChannel, equivalent_channel
from .config import ScenarioError, ScenarioParams, UnflyableError, db_to_linear, linear_to_db, load_scenario
from .energy import EnergyBreakdown, data_per_flight, energy_breakdown
from .mac_sim import McEstimate, MacEpisode, estimate, run_episode
from .sweep import SweepRecord, optimize_n, run_sweep

__version__ = "0.1.0"
