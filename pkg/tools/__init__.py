"""Utility tools"""
