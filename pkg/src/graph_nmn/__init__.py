"""A differentiable module network reasoning over visual, semantic and commonsense graphs."""
