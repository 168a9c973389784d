"""Reproducible desk-scale experiment suite behind the CLI."""

from .scenarios import (
    DriveResult,
    EGO_ID,
    MergeOutcome,
    MergeSetup,
    drive_with_planner,
    insert_ego,
    run_merge_episode,
)
