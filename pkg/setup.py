# -*- coding: utf-8 -*
import os

from setuptools import setup, find_packages

with open('README.rst', 'r') as fp:
    readme = fp.read()

version = {}
with open(os.path.join('src', 'einstab', '_version.py'), 'r') as fp:
    exec(fp.read(), version)

pkgs = find_packages('src')
print('found these packages:', pkgs)


reqs = [
    'numpy',
    'pandas',
    'ruamel.yaml',
    'setuptools',
    'sympy',
    'tqdm',
    'hdmf-docutils',
]
print(reqs)

setup_args = {
    'name': 'einstab',
    'version': version['__version__'],
    'description': 'Certified instability of invariant Einstein metrics on compact homogeneous spaces',
    'long_description': readme,
    'long_description_content_type': 'text/x-rst; charset=UTF-8',
    'author': 'einstab developers',
    'license': "BSD",
    'install_requires': reqs,
    'extras_require': {'test': ['pytest']},
    'packages': pkgs,
    'package_dir': {'': 'src'},
    'package_data': {'einstab': ['data/*.yaml']},
    'python_requires': '>=3.8',
    'classifiers': [
        "Programming Language :: Python",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: BSD License",
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: MacOS",
        "Operating System :: Unix",
        "Topic :: Scientific/Engineering :: Mathematics"
    ],
    'keywords': 'python '
                'differential-geometry '
                'einstein-metrics '
                'homogeneous-spaces '
                'lie-algebras '
                'reproducible-research ',
    'zip_safe': False,
    'entry_points': {
        'console_scripts': ['einstab = einstab.cli:main'],
    }
}

if __name__ == '__main__':
    setup(**setup_args)
