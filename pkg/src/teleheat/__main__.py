import sys

from teleheat.cli import main

sys.exit(main())
