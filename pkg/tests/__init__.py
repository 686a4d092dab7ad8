"""Tests for the shadowqec logical-qubit simulator."""
