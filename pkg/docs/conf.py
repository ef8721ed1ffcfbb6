# Sphinx documentation builder configuration,
# options reference: http://www.sphinx-doc.org/en/master/config
import os
import sys
from datetime import date

sys.path.insert(0, os.path.abspath('..'))

import smlmsim

project = smlmsim.__name__
copyright = f'{date.today().year}, smlmsim developers'
author = 'smlmsim developers'
release = smlmsim.__version__

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.viewcode',
]
templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
master_doc = 'index'

html_theme = 'sphinx_rtd_theme'

autodoc_member_order = 'bysource'
