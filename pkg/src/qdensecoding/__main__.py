import sys

from qdensecoding.cli import main

sys.exit(main())
