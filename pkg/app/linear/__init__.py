"""Linearized contact-discontinuity problem in straightened variables"""
