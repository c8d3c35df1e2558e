"""
Spiking-network user association pipeline.
"""
