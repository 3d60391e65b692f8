"""
Setup script for the MIMO switching relay precoding package.

This makes the project installable as a package and defines the
`mimoswitch` command-line entry point.
"""

from setuptools import setup, find_packages

# Define core dependencies directly
core_reqs = [
    'numpy==1.24.3',
    'scipy==1.10.1',
    'pandas==2.0.3',
]

setup(
    name="mimo-switch-precoding",
    version="1.0.0",
    description="Relay precoding for MIMO switching with Monte Carlo evaluation",
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    author="mimoswitch developers",
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    install_requires=core_reqs,
    extras_require={
        'test': [
            'pytest==7.4.0',
            'pytest-cov==4.1.0'
        ],
        'dev': [
            'pytest==7.4.0',
            'pytest-cov==4.1.0'
        ]
    },
    entry_points={
        'console_scripts': [
            'mimoswitch=mimoswitch.cli.main:main',
        ],
    },
    python_requires='>=3.8',
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
)
