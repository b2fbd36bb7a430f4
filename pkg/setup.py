# -*- coding: utf-8 -*-

from setuptools import setup, find_packages
from codecs import open
from os import path


here = path.abspath(path.dirname(__file__))


def readfile(fn):
    """Read fn and return the contents."""
    with open(path.join(here, fn), 'r', encoding='utf-8') as f:
        return f.read()

setup(
    name='kgaccuracy',
    packages=find_packages(exclude=['tests*']),
    version='0.1.0',
    description='Efficient accuracy estimation of knowledge graphs with '
                'Bayesian credible intervals',
    author='kgaccuracy developers',
    keywords=['knowledge graph', 'accuracy', 'credible interval', 'HPD',
              'sampling', 'annotation'],
    license='GPLv3+',
    zip_safe=False,
    python_requires='>=3.8',
    install_requires=['numpy>=1.17'],
    extras_require={'tests': ['pytest', 'pytest-cov']},
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Development Status :: 4 - Beta',
        'License :: OSI Approved :: GNU General Public License v3 or later \
(GPLv3+)',
        'Operating System :: OS Independent',
        'Natural Language :: English',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'Topic :: Scientific/Engineering :: Mathematics'
    ],
    long_description='\n\n'.join([readfile(f) for f in ('README.rst',)]),
    entry_points={'console_scripts':
                  ['kgaccuracy = kgaccuracy.scripts.kgaccuracy:main']}
)
