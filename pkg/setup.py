from setuptools import setup, find_packages

with open("README.md", "r") as f:
    long_description = f.read()

setup(
    name="szm",
    version="0.3.1",
    description=
    "A type checker and interpreter for a Curry-style System F with sized inductive and coinductive types, checking termination with circular proofs.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=['type checker', 'system f', 'sized types', 'subtyping', 'size-change principle', 'circular proofs'],
    license="GPL-3.0",
    python_requires='>=3.7',
    install_requires=["numpy", "scipy~=1.5", "more_itertools==8.6.0", "pyyaml"],
    packages=find_packages(exclude=["tests"]),
    entry_points={"console_scripts": ["szm = szm.cli:main"]},
    zip_safe=False,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Topic :: Software Development :: Compilers',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3.9',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)'
    ]
)
