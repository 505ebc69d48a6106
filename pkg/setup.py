import setuptools

setuptools.setup(
    name='cwenolab',
    version='0.3.0',
    description='CWENO / CWENOZ / WENO finite volume laboratory',
    install_requires = ['numpy', 'openpyxl', 'sympy'],
    extras_require = {'test' : ['pytest']},
    packages = ["cwenolab"],
    entry_points = {
        "console_scripts" : [
            "cwenolab=cwenolab.bench:command_line",
        ]
    }
)
