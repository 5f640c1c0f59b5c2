# FILE: src/__init__.py
# Marks 'src' as a package so the numbered root scripts and the tests can
# import its modules as `from src.<module> import ...`.
