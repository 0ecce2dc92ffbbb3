"""설정, 파일 입출력, 로깅 유틸리티"""
