"""Core numerics: plant, kernels, control, identification, safety, diagnostics."""
