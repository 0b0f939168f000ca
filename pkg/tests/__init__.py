"""
Tests for isocone

Unit, property-based and seeded acceptance tests for the cone model, the
isotonic projection checks, the projection solvers and the CLI.
"""
