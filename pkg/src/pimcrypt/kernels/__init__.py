"""Fabric kernels: layouts, command generators and mode orchestration."""
