import sys

from hypercat.cli import main

sys.exit(main())
