"""어닐링 시뮬레이션 엔진: Ising 변환, 노이즈, 전파, Magnus 검증, MAGIC 결합"""
