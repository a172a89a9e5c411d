"""Language-dependent in-sandbox runners.

pyharness.py is shipped as data, copied into scratch directories and
invoked as a subprocess; the engine never imports it.
"""
