"""QUBO 문제 생성기와 fixture"""
