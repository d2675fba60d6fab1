"""Interface straightening and basic-state audit"""
