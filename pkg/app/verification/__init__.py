"""Property suites, seeded samplers and refinement studies"""
