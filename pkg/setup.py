from distutils.core import setup
import setuptools

setup(
    name='semi-hilbert-lab',
    packages=[
        'semi_hilbert_lab',
        'semi_hilbert_lab.inequalities'
    ],
    entry_points={
        'console_scripts': [
            'shlab = semi_hilbert_lab.__main__:_main'
        ]
    },
    version='0.1',
    license='MIT',
    description="""Numerical laboratory for operators on semi-Hilbertian
        spaces: A-adjoints, A-numerical radii and seeded verification of
        operator inequalities""",
    keywords=['semi-inner product', 'numerical radius', 'operator theory',
              'positive operator', 'inequalities', 'fuzzing'],
    install_requires=[
        'numpy',
        'scipy'
    ],
    extras_require={
        'test': [
            'pytest',
            'hypothesis'
        ]
    },
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ]
)
