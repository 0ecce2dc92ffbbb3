"""안정성 Monte Carlo, DD sweep, 피팅과 스케일링 붕괴"""
