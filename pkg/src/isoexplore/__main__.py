import sys

from isoexplore.cli import main

sys.exit(main())
