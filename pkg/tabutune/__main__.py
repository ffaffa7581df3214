import sys

from tabutune.cli import main

sys.exit(main())
