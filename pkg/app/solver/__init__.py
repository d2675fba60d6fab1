"""Time integration of the linearized contact problem and the periodic RMHD system"""
