import sys

from curveml.cli import main

sys.exit(main())
