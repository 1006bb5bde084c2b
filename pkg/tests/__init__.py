"""Test package for the random-access simulator"""
