from setuptools import setup, find_packages

setup(
    name="reachtamp",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.9",
    install_requires=[
        "typer",
        "rich",
        "python-dotenv",
        "pydantic>=2.0.0",
        "numpy>=1.22",
        "lark>=1.1",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "reachtamp=reachtamp.cli.interface:app",
        ],
    },
)
