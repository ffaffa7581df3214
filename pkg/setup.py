from setuptools import setup  # type: ignore

# metadata lives in setup.cfg
if __name__ == "__main__":
    setup()
