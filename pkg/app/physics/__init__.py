"""RMHD physics: equation of state, kinematics, symmetrizer, characteristics, jumps"""
