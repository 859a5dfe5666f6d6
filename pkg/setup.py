from setuptools import setup

setup(
    name = "gkp_prep_tool",
    author = "",
    author_email = "",
    license = "Apache",
    packages=['gkp_prep_tool', 'circuitparse'],
    package_data={'circuitparse': ['test_data/*.txt']},
    install_requires=['absl-py', 'termcolor', 'numpy', 'scipy'],
    extras_require={'test': ['hypothesis']},
    scripts=['gkp_prep.py'],
)
