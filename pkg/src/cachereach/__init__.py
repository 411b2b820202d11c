"""Exact cache-analysis decision procedures and hardness reductions."""
