from ._kitaoka import *  # noqa: F401,F403
from ._kitaoka import KitaokaError  # noqa: F401
