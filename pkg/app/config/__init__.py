"""
Configuration module for Adelic Desk
"""

from app.config.settings import settings

__all__ = ['settings']
