import getpass
import platform

from tabutune.utils.config import Config


class GlobalConfig(Config):
    caching = True
    debug = False
    json_allowed_modules = [r"tabutune\..*"]
    json_forbidden_modules = [r".*eval", r".*subprocess.*"]
    user = f"{platform.node()}/{getpass.getuser()}"
    log_format = '%(levelname)s %(asctime)s - %(name)s : %(message)s'
    log_datefmt = "%d-%m-%y %H:%M"
    seed_env_var = "TABUTUNE_SEED"


config = GlobalConfig()
