# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
import sphinx_rtd_theme

project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, os.path.join(project_root, 'src'))

from einstab import __version__  # noqa: E402
from einstab.cli import AnalysisConfig, render_rst, run  # noqa: E402

verdict_pages_dir = os.path.join(os.path.dirname(__file__), 'verdict_pages')

# -- Autodoc configuration -----------------------------------------------------
autoclass_content = 'both'
autodoc_docstring_signature = True
autodoc_member_order = 'bysource'

# -- Project information -----------------------------------------------------
project = 'einstab'
copyright = '2024, einstab developers'
author = 'einstab developers'
version = __version__
release = __version__

# -- General configuration ---------------------------------------------------
extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
    'sphinx_tabs.tabs',
    'sphinx_copybutton'
]

templates_path = ['_templates']
source_suffix = '.rst'
exclude_patterns = ['_build', 'test.py']
master_doc = 'index'
add_function_parentheses = False
sphinx_tabs_valid_builders = ['linkcheck']

# -- Options for HTML output -------------------------------------------------
html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_static_path = []
html_theme_options = {
    'logo_only': False,
    'display_version': True,
    'prev_next_buttons_location': 'bottom',
    'style_external_links': True,
    'vcs_pageview_mode': '',
    'style_nav_header_background': 'darkgray',
    'collapse_navigation': True,
    'sticky_navigation': True,
    'navigation_depth': 4,
    'includehidden': True,
    'titles_only': False
}

latex_engine = 'pdflatex'


def run_apidoc(_):
    from sphinx.ext.apidoc import main as apidoc_main
    out_dir = os.path.dirname(__file__)
    src_dir = os.path.join(out_dir, '../../src')
    sys.path.append(src_dir)
    apidoc_main(['-f', '-e', '--no-toc', '-o', out_dir, src_dir])


def skip(app, what, name, obj, skip, options):
    if name == "__getitem__":
        return False
    return skip


def setup(app):
    app.connect('builder-inited', run_apidoc)
    app.connect("autodoc-skip-member", skip)
    # Create the verdict pages if they are missing
    report_rst = os.path.join(verdict_pages_dir, "report.rst")
    low_dimensional_rst = os.path.join(verdict_pages_dir, "low_dimensional.rst")
    if not os.path.exists(report_rst) or not os.path.exists(low_dimensional_rst):
        os.makedirs(verdict_pages_dir, exist_ok=True)
        render_rst(run(AnalysisConfig.create('report', format='rst', output=report_rst)), report_rst)
        render_rst(run(AnalysisConfig.create('analyze', space='low-dimensional', format='rst',
                                             output=low_dimensional_rst)), low_dimensional_rst)
    else:
        print("\033[1mSKIPPING: verdict pages... \033[0m done  (delete docs/source/verdict_pages to rebuild)")
