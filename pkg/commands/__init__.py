"""privad command-line commands"""
