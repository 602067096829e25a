"""Utility modules for ipstar-lab"""
