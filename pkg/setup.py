#! /usr/bin/env python

from setuptools import setup

def readme():
    with open('README.md') as f:
        return f.read()


setup(name = "tdep",
      version = "0.1",
      description = "transport dependency of joint probability measures",
      long_description = readme(),
      long_description_content_type = "text/markdown",
      classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
      ],
      license='MIT',
      packages = ["tdep", "tdep.examples", "tdep.tests"],
      include_package_data=True,
      zip_safe = True,
      test_suite = 'tdep.tests',
      python_requires='>=3.6',
      install_requires=['numpy>=1.17', 'scipy', 'POT'],
      extras_require={'examples': ['matplotlib']},
      entry_points={'console_scripts': ['tdep=tdep.cli:main']})
