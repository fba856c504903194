"""
Тестовый модуль для Jost Pole Service
"""

