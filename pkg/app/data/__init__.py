"""Data layer"""
