#!/usr/bin/env python
import os
import sys
import unittest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

suite = unittest.defaultTestLoader.discover('tests', top_level_dir='.')
result = unittest.TextTestRunner(verbosity=int(os.environ.get('TEST_VERBOSITY', '1'))).run(suite)

sys.exit(0 if result.wasSuccessful() else 1)
